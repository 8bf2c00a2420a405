package org.shop.cart;

import static java.lang.Math.max;
import static org.shop.util.Prices.*;
import java.util.List;
import java.util.ArrayList;
import org.shop.model.Item;

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
