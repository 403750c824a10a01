public class Calc {

    int f(int a) {
        return a;
    }

    int f(int a, int b) {
        return a + b;
    }

    int g() {
        return f(1, 2);
    }

    int h() {
        return unique(3);
    }

    int unique(int a) {
        return a * 2;
    }
}
