public class Main {

    static int unused(int x) {
        return x;
    }

    static int absDiff(int a, int b) {
        int d = a - b;
        if (d < 0) {
            d = d + 1;
        }
        return d;
    }
}
