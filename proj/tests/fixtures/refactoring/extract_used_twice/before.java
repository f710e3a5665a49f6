package com.example.queue;

import org.junit.Test;
import static org.junit.Assert.assertTrue;

public class QueueTest {
    private Queue<String> queue;

    @Test
    public void drainsAll() {
        queue = new Queue<>();
        queue.push("a");
        queue.push("b");
        queue.drain();
        assertTrue(queue.isEmpty());
    }
}
