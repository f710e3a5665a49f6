package com.example;

import org.junit.jupiter.api.Nested;
import org.junit.jupiter.api.Test;
import static org.junit.jupiter.api.Assertions.assertTrue;

class StackTest {
    @Nested
    class WhenEmpty {
        @Test
        void isEmptyAfterConstruction() {
            assertTrue(new Stack<Integer>().isEmpty());
        }
    }
}
