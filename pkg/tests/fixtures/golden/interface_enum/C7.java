

interface ShapeArea {
    double area();
}

enum Color { RED, GREEN }

class Circle implements ShapeArea {
    public double area() { return Math.PI; }
}
