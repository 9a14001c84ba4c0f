package demo;

public class Util {
    public Util() {
        log("init");
    }

    /** Trims and lower-cases the text. */
    public String trimAll(String s) {
        return s.trim().toLowerCase();
    }

    /** Writes a message to standard output. */
    public void log(String msg) {
        System.out.println(msg);
    }

    /** Increments a. */
    public int add(int a) {
        return a + 1;
    }

    /** Adds two integers. */
    public int add(int a, int b) {
        return a + b;
    }

    /** Returns a fixed total. */
    public int total() {
        return add(1, 2) + Integer.valueOf(3);
    }
}
