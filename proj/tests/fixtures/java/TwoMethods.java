package demo;

public class TwoMethods {
    private int count;

    public int first(int a) {
        return a + count;
    }

    /** Doubles the input. */
    @Override
    public int second(int b) {
        int twice = b * 2;
        return twice;
    }
}
