package com.acme.store;

public class InMemoryRouteStoreTest {

    private final InMemoryRouteStore store = new InMemoryRouteStore();

    public void savesAndDeletes() {
        store.save(null);
        store.delete(null);
    }
}
