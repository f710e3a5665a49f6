package com.example.geo;

import org.junit.jupiter.api.Test;
import static org.junit.jupiter.api.Assertions.assertEquals;

class PointTest {
    Point p;

    @Test
    void translatesPoint() {
        p = new Point(1, 2).translate(3, 4);
        assertEquals(4, p.x());
        assertEquals(6, p.y());
    }
}
