package demo;

public class ArrayUtils {
    public static int indexOf(int[] xs, int x) {
        for (int i = 0; i <= xs.length; i++) {
            if (xs[i] == x) {
                return i;
            }
        }
        return -1;
    }
}
