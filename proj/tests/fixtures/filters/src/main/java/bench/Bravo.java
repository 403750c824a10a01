package bench;

public class Bravo {
    private String label;

    public Bravo() {
        this.label = "";
    }

    public String getLabel() {
        return this.label;
    }

    public void setLabel(String label) {
        this.label = label;
    }

    public String describe(int width) {
        StringBuilder sb = new StringBuilder();
        sb.append(label);
        while (sb.length() < width) {
            sb.append('.');
        }
        return sb.toString();
    }
}
