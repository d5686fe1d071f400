public class Main {

    static int unused(int x) {
        return x;
    }

    static int fact(int n) {
        if (n == 0) {
            return 0;
        }
        return n * fact(n - 1);
    }
}
