package bank;

final class Util {
    /** Bounds a value to the closed range. */
    static int clamp(int value, int lo, int hi) {
        return min(max(value, lo), hi);
    }

    static int max(int a, int b) {
        return a > b ? a : b;
    }

    static int min(int a, int b) {
        return a < b ? a : b;
    }
}
