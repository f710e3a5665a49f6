package com.example.io;

import org.junit.Test;
import static org.junit.Assert.assertFalse;

public class FileStoreTest {
    private FileStore store = FileStore.inMemory();

    @Test
    public void deleteRemovesFile() {
        store.write("x", new byte[0]);
        store.delete("x");
        verifyGone();
    }

    private void verifyGone() {
        assertFalse(store.exists("x"));
    }
}
