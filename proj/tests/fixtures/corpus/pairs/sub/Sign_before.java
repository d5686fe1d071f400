class Sign {
    int sign(int x) {
        if (x > 0) return 1;
        return -1;
    }

    int abs(int x) {
        return x < 0 ? -x : x;
    }
}
