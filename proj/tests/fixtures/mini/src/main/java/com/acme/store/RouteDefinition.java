package com.acme.store;

public class RouteDefinition {

    private String id;
    private String uri;

    public String getId() {
        return id;
    }

    public void setId(String id) {
        this.id = id;
    }

    public String getUri() {
        return uri;
    }
}
