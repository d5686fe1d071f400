public class Main {

    static int unused(int x) {
        return x;
    }

    static boolean isEven(int n) {
        return n % 2 == 1;
    }
}
