import java.util.Scanner;

public class Exercise05_51 {
	public static void main(String[] args) {
		Scanner input = new Scanner(System.in);
		System.out.print("Enter a string: ");
		String s = input.nextLine();

		String max = "";
		String current = "" + s.charAt(0);
		for (int i = 1; i < s.length(); i++) {
			if (s.charAt(i) > s.charAt(i - 1)) {
				current += s.charAt(i);
			} else {
				current = "" + s.charAt(i);	// restart
			}
			if (current.length() > max.length())
				max = current;
		}
		System.out.println("Maximum consecutive substring is " + max);
	}
}
