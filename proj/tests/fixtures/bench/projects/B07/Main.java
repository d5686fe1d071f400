public class Main {

    static int unused(int x) {
        return x;
    }

    static int clampLow(int x, int lo) {
        return x < lo ? x : lo;
    }
}
