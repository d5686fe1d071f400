public class Main {

    static int unused(int x) {
        return x;
    }

    static int lastIndex(int[] xs) {
        return xs.length;
    }
}
