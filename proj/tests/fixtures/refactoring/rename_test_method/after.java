package com.example;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class CalculatorTest {
    @Test
    public void addsTwoPositiveNumbers() {
        assertEquals(4, new Calculator().add(2, 2));
    }

    @Test
    public void subtracts() {
        assertEquals(0, new Calculator().sub(2, 2));
    }
}
