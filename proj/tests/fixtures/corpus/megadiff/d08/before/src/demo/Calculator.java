package demo;

public class Calculator {
    private int last;

    public int add(int a, int b) {
        last = a - b;
        return last;
    }

    public int mul(int a, int b) {
        last = a * b;
        return last;
    }
}
