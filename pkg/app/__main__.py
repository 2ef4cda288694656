"""
python -m app 진입점
"""
from app.cli import run

if __name__ == "__main__":
    run()
