class Engine:
    def start(self):
        return 'vroom'

class Electric:
    def start(self):
        return 'hum'

class Car:
    def __init__(self, engine):
        self.engine = engine
    def swap(self, engine):
        self.engine = engine
    def drive(self):
        return self.engine.start()

def main():
    car = Car(Engine())
    first = car.drive()
    car.swap(Electric())
    second = car.drive()
