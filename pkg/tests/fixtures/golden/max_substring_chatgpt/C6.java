import java.util.Scanner;

public class MaxConsecutiveSubstring {
    public static void main(String[] args) {
        Scanner scanner = new Scanner(System.in);
        System.out.print("Enter a string: ");
        String input = scanner.nextLine();

        String longest = "";
        String run = "";
        for (int i = 0; i < input.length(); i++) {
            if (i == 0 || input.charAt(i) > input.charAt(i - 1)) {
                run += input.charAt(i);
            } else {
                run = String.valueOf(input.charAt(i));
            }
            if (run.length() > longest.length()) {
                longest = run;
            }
        }

        System.out.println("Maximum consecutive substring: " + longest);
    }
}
