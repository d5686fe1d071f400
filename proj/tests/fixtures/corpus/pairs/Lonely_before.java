class Lonely {
    void f() {
    }
}
