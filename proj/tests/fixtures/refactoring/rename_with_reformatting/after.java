package com.example;

import org.junit.Test;
import static org.junit.Assert.*;

public class ParserTest {
    /** Parsing a simple sum yields a tree. */
    @Test
    public void parsesSimpleSum() {
        Parser p = new Parser();
        assertNotNull(p.parse("1+2"));
    }
}
