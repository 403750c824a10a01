package shared;

public class Thing {

    int one() {
        return 1;
    }
}
