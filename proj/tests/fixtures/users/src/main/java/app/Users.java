package app;

import java.util.ArrayList;
import java.util.List;

public class Users {
    private List<User> cache = new ArrayList<>();

    public User getUserById(long id) {
        for (User u : cache) {
            if (u.getId() == id) {
                return u;
            }
        }
        return null;
    }

    public User getUserByName(String name) {
        for (User u : cache) {
            if (name.equals(u.getName())) {
                return u;
            }
        }
        return null;
    }

    public void save(User user) {
        cache.add(user);
    }

    public void run(int a) {
        save(null);
    }

    public void run(int a, int b) {
        run(a);
        run(b);
    }
}
