package demo.text;

public final class StringUtils {
    private StringUtils() {
    }

    public static boolean isBlank(String s) {
        if (s == null) {
            return true;
        }
        return s.length() == 0;
    }

    public static String trimToNull(String s) {
        String t = s.trim();
        return t.isEmpty() ? null : t;
    }
}
