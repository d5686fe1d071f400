package demo;

public class Config {
    private int retries = 1;

    public int retries() {
        return retries;
    }
}
