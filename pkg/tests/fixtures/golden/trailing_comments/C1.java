import java.util.Arrays;

public class SortNumbers {	// entry point
	public static void main(String[] args) {
		int[] a = {5, 3, 9, 1};	/* data */
		Arrays.sort(a);   // ascending

		/* print
		   them all */
		for (int v : a) System.out.print(v + " ");
		System.out.println();
	}
}
