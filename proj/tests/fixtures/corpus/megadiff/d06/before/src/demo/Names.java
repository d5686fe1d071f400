package demo;

import java.util.List;

public class Names {
    public String first(List<String> names) {
        return names.get(0);
    }
}
