public class Logs {

    void log(String... parts) {
    }

    void emit() {
        log("a", "b");
    }
}
