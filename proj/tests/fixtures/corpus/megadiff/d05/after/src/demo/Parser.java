package demo;

public class Parser {
    public int parseInt(String s) {
        int value = 0;
        for (char c : s.toCharArray()) {
            if (c < '0' || c > '9') {
                throw new NumberFormatException(s);
            }
            value = value * 10 + (c - '0');
        }
        return value;
    }
}
