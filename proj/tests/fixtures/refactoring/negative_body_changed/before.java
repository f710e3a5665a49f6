package com.example;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class MathTest {
    @Test
    public void test1() {
        assertEquals(4, Math.abs(-4));
    }
}
