package com.example.http;

import org.junit.jupiter.api.Test;
import static org.junit.jupiter.api.Assertions.assertEquals;

class RouterTest {
    Router router = new Router();

    @Test
    void routesByPath() {
        router.add("GET", "/a", req -> "A");
        router.add("GET", "/b", req -> "B");
        assertEquals("B", router.handle("GET", "/b"));
    }
}
