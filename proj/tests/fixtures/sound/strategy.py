class Fast:
    def go(self, x):
        return x * 2

class Slow:
    def go(self, x):
        return x + 1

class Runner:
    def __init__(self):
        self.strategies = [Fast(), Slow()]
    def run_all(self, x):
        while len(self.strategies) > 0:
            s = self.strategies.pop()
            x = s.go(x)
        return x

def main():
    r = Runner()
    out = r.run_all(1)
