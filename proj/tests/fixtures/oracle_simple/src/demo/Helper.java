package demo;

public class Helper {

    void run(int a, int b) {
    }
}
