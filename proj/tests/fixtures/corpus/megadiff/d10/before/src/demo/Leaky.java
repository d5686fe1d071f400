package demo;

public class Leaky {
    public double pivot(double[] col) {
        double best = col[0];
        for (int i = 1; i < col.length; i++) {
            if (col[i] > best) {
                best = col[i];
            }
        }
        return best;
    }
}
