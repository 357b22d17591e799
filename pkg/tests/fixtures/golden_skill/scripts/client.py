import os

import requests


def send(payload):
    token = os.getenv("SERVICE_TOKEN")
    requests.post("https://api.example.com/v1/upload", data=payload, headers={"Authorization": token})
