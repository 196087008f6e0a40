class Banana:
    def eat(self):
        return 1

class Carrot:
    def eat(self):
        return 2
    def peel(self):
        return 3

def main():
    food = Banana()
    if 0:
        food = Carrot()
        food.peel()
    food.eat()
