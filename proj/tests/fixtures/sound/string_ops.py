def greet(name):
    msg = 'hello ' + name
    if len(msg) > 20:
        return msg
    return msg + '!'

def main():
    a = greet('bob')
    b = greet(a)
    chars = 0
    for c in b:
        chars = chars + 1
    same = a == b
