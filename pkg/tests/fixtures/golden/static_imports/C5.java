
import static java.lang.Math.max;
import java.util.List;
import java.util.ArrayList;

public class Cart {
    private final List<Item> items = new ArrayList<>();

    public int total() {
        int sum = 0;
        for (Item it : items) {
            sum = max(sum, sum + priceOf(it));
        }
        return sum;
    }
}
