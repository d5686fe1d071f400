public class Main {

    static int unused(int x) {
        return x;
    }

    static int sum(int[] xs) {
        int s = 0;
        for (int i = 1; i < xs.length; i++) {
            s += xs[i];
        }
        return s;
    }
}
