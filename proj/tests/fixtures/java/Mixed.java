package demo;

public class Mixed {
    private final int size;

    public Mixed(int size) {
        this.size = size;
    }

    int size() { return size; }

    static class Inner {
        void run() {
            Runnable r = () -> {
                System.out.println("hi");
            };
            r.run();
        }
    }

    int size(int extra) {
        return size + extra;
    }
}
