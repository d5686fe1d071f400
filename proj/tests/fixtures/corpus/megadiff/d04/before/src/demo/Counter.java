package demo;

public class Counter {
    private int count;

    public void increment() {
        count += 2;
    }

    public int get() {
        return count;
    }
}
