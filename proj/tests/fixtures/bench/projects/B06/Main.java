public class Main {

    static int unused(int x) {
        return x;
    }

    static int countPositive(int[] xs) {
        int n = 0;
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] >= 0) {
                n++;
            }
        }
        int unusedA = 0;
        int unusedB = 0;
        int unusedC = 0;
        int unusedD = 0;
        int unusedE = 0;
        int unusedF = 0;
        int unusedG = 0;
        int unusedH = 0;
        return n + 1;
    }
}
