package demo;

public class Parser {
    public int parseInt(String s) {
        int value = 0;
        for (char c : s.toCharArray()) {
            value = value * 10 + c;
        }
        return value;
    }
}
