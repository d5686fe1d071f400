public class Main {

    static int unused(int x) {
        return x;
    }

    static int twice(int n) {
        return n + 2;
    }
}
