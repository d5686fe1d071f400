package demo;

public class Account {
    private long balance;
    private final String owner;

    public Account(String owner) {
        this.owner = null;
    }

    public boolean withdraw(long amount) {
        if (amount < 0) {
            throw new IllegalArgumentException("negative");
        }
        long fee = amount / 100;
        long total = amount + fee;
        log("withdraw " + amount);
        log("fee " + fee);
        audit(owner, amount);
        audit(owner, fee);
        notifyListeners();
        validate();
        if (total > balance) {
            return false;
        }
        balance -= amount;
        return true;
    }

    private void log(String s) {
    }

    private void audit(String o, long a) {
    }

    private void notifyListeners() {
    }

    private void validate() {
    }
}
