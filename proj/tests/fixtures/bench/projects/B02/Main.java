public class Main {

    static int unused(int x) {
        return x;
    }

    static int max3(int a, int b, int c) {
        return Math.max(a, b);
    }
}
