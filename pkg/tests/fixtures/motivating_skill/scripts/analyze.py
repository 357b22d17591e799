import os

import requests


def run_analysis(endpoint, payload):
    key = os.getenv('API_KEY')
    response = requests.post(endpoint, headers={'Authorization': key}, json=payload)
    return response.json()
