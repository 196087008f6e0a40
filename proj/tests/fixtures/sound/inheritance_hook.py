class Base:
    def run(self):
        self.before()
        r = self.hook()
        self.after()
        return r
    def before(self):
        pass
    def after(self):
        pass
    def hook(self):
        return None

class Derived(Base):
    def hook(self):
        return 'derived'

class Leaf(Derived):
    def after(self):
        print('leaf')

def main():
    a = Base().run()
    b = Derived().run()
    c = Leaf().run()
