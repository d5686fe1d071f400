public class Main {

    static int unused(int x) {
        return x;
    }

    static int triple(int n) {
        return n * 2;
    }
}
