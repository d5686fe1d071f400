package demo;

public class Log {
    public void write(String msg) {
        System.out.println("debug: " + msg);
        System.out.println(msg);
    }
}
