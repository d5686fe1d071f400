package demo;

public class Shapes {
    public double area(double r) {
        return 3.14 * r;
    }

    public double perimeter(double r) {
        return 3.14 * r;
    }

    public double volume(double r) {
        return 4.0 / 3.0 * 3.14 * r * r * r;
    }
}
