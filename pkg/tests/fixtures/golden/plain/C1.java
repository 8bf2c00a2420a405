public class Example {
    public static void main(String[] args) {
        int x = 5;
        int y = 7;
        int z = x + y;
        System.out.println(z);
    }
}
