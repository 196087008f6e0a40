class Name:
    def __init__(self):
        self.id = 'x'

class If:
    def __init__(self):
        self.test = Name()

class While:
    def __init__(self):
        self.test = Name()

class Visitor:
    def visit(self, node):
        method = 'visit_' + node.__class__.__name__
        visitor = getattr(self, method, self.generic_visit)
        return visitor(node)

    def generic_visit(self, node):
        return None

    def visit_Name(self, node):
        return node.id

    def visit_If(self, node):
        return self.visit(node.test)

    def visit_While(self, node):
        return self.visit(node.test)

def main():
    v = Visitor()
    n = Name()
    n = If()
    v.visit(n)
