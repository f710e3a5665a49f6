package com.example.util;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class StringsTest {
    // Reverses by code unit.
    private static String reversed(String s) {
        return new StringBuilder(s).reverse().toString();
    }

    @Test
    public void reversesWords() {
        assertEquals("cba", reversed("abc"));
    }
}
