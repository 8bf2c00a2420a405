
public class Exercise09_08 {
    static class Exercise09_08Helper {
        int value() {
            return 42;
        }
    }

    public static void main(String[] args) {
        Exercise09_08 app = new Exercise09_08();
        Exercise09_08Helper h = new Exercise09_08Helper();
        System.out.println("Exercise09_08: " + h.value() + app.hashCode());
    }
}

class Fan {
    int speed = 1;
}
